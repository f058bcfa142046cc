from ._igkit import IgkitError, Model, verify_all

__all__ = ["IgkitError", "Model", "verify_all"]
