"""CLI entrypoints."""

