from vigil.units import KilometersPerHour, MetersPerSecondSquared, PixelIntensity, Seconds

# Every synthetic camera frame has the same geometry.
FRAME_WIDTH = 64
FRAME_HEIGHT = 64

# The eye box is a fixed rectangle within the frame. Rows are inclusive at the start and exclusive at the end.
EYE_BOX_FIRST_ROW = 16
EYE_BOX_ROW_COUNT = 16
EYE_BOX_FIRST_COLUMN = 24
EYE_BOX_COLUMN_COUNT = 16

# Open eyelid rows are rendered bright, everything else is rendered dark.
BRIGHT_INTENSITY: PixelIntensity = 230
DARK_INTENSITY: PixelIntensity = 40
# Bounded uniform noise added to every pixel
INTENSITY_NOISE_AMPLITUDE: PixelIntensity = 5
# A row of the eye box counts as 'open' when its mean intensity exceeds this.
OPEN_ROW_INTENSITY_THRESHOLD: PixelIntensity = 128
MAX_PIXEL_INTENSITY: PixelIntensity = 255

# Each degree of head pitch moves the eye box by half a row.
DEGREES_PER_EYE_BOX_ROW_SHIFT = 2

# The accelerometer saturates at this magnitude.
MAXIMUM_ACCELERATION_MAGNITUDE_G = 8.0

# 1 m/s^2 of deceleration removes 3.6 km/h of speed every second.
KILOMETERS_PER_HOUR_PER_METER_PER_SECOND = 3.6

SECONDS_PER_MINUTE: Seconds = 60
HOURS_PER_DAY = 24
SECONDS_PER_HOUR: Seconds = 3600

# Used when comparing timestamps that were produced by adding up float tick periods
TIMESTAMP_EPSILON: Seconds = 1e-9

# For reader clarity
ZERO_SPEED: KilometersPerHour = 0.0
NO_DECELERATION: MetersPerSecondSquared = 0.0
