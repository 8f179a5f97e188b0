"""HDRG planar-code decoder - simulator, decoder library and benchmark harness."""
