"""df_forge: Levi forms, Hessian frames and Diederich-Fornaess exponent estimates on C^2."""
__version__ = "0.1.0"
