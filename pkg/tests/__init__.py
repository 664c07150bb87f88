"""Empty test file to ensure tests directory is recognized."""
