"""
🧰 Utilities Package for spincyl
===============================

Settings, errors, console output, serialization and numerical helpers shared
by every package.
"""

__all__ = ['config', 'console', 'errors', 'formatting', 'numerics']
