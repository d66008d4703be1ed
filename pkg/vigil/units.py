import numpy as np

# Simulated seconds since the scenario started. There is no wall clock anywhere in the simulation.
Seconds = float
UnixSeconds = int
ClockHours = float
Hours = float
PerHour = float

Degrees = float
Fraction = float
Percent = float

Hertz = float
BlinksPerMinute = float
NodsPerMinute = float
BeatsPerMinute = float

# Acceleration expressed in units of standard gravity
GForce = float
MetersPerSecondSquared = float
KilometersPerHour = float

# Dimensionless score produced by the alertness model
AlertnessUnits = float

PixelIntensity = int
TickIndex = int
SampleCount = int

# Row-major grayscale pixel buffer, dtype uint8
PixelBuffer = np.ndarray
# Columns of (timestamp, value) pairs
TimestampArray = np.ndarray
