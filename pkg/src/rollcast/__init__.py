"""Rolling-origin traffic forecasting with SARIMAX and additive Holt-Winters."""

__version__ = "0.1.0"
