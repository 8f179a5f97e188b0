"""Unit tests for models."""


