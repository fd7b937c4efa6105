"""Bundled rule tables and the synthetic mini-corpus."""
