"""loopfinder - Find loops in term rewrite systems by guided unfolding of dependency pairs."""

__version__ = "0.1.0"
