"""lenskit tests."""
