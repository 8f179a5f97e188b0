"""Test fixtures module."""


