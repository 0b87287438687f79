"""Latent stochastic DE models for multivariate time series."""
__version__ = "0.1.0"
