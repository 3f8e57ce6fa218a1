"""Physical constants shared across the package."""

# exact SI value; no medium effects anywhere in the package
SPEED_OF_LIGHT = 299_792_458.0
