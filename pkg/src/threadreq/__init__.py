"""threadreq: from a discussion-room export to prioritized initial requirements."""

__version__ = "0.1.0"
