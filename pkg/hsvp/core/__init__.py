"""Core domain: class hierarchies, class distributions and their errors."""
