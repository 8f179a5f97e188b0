"""Test utilities and helpers."""


