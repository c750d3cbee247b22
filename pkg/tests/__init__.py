# This file is intentionally empty to make the tests directory a Python package.
