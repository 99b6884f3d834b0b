"""Minimal free resolutions, Ext charts, and connecting maps over finite
subalgebras of the mod-p Steenrod algebra."""

__version__ = "0.1.0"
