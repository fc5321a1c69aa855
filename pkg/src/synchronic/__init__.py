"""Synchronic: a cycle-accurate register-array machine, its assembler, an
interstring dataflow language, and a compiler for an explicitly parallel
interlanguage, wrapped in an HTTP service with a thin CLI client."""

__version__ = "0.1.0"
