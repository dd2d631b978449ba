"""Plug-in and imputation estimators under model misspecification."""
