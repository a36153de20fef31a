"""
🔄 Workflows Package for spincyl
===============================

Verification cases and the workflow that runs them.
"""

# submodules are imported explicitly; the workflow pulls in every engine
__all__ = ['cases', 'verification_workflow']
