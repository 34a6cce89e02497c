"""Statechart networks, their translation to timed automata, and the tools to
check that the two agree."""

__version__ = "0.1.0"
