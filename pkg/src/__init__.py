"""Top-level package for the hexagonal disc-covering toolkit."""
