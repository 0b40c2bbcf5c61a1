"""Screening with an unaware principal: menus, beliefs, and disclosure."""

__version__ = "0.1.0"
