"""Unit tests for services."""


