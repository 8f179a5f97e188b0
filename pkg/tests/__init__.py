"""Test suite for the HDRG decoder package."""
