from vigil.units import (
    AlertnessUnits,
    BeatsPerMinute,
    BlinksPerMinute,
    ClockHours,
    Degrees,
    Fraction,
    Hertz,
    Hours,
    KilometersPerHour,
    MetersPerSecondSquared,
    NodsPerMinute,
    PerHour,
    Seconds,
)

# Default sampling rates of the simulated sensors. The tick period must be an integer multiple of each sample period.
FRAME_RATE: Hertz = 10
ACCELEROMETER_RATE: Hertz = 50
PPG_RATE: Hertz = 100
# The harness advances its logical clock by this much per tick.
TICK_PERIOD: Seconds = 0.1

# Vision evidence is computed over this much trailing history.
BLINK_ANALYSIS_WINDOW: Seconds = 10
# Shorter windows give blink counts too coarse to mean anything.
MINIMUM_BLINK_ANALYSIS_WINDOW: Seconds = 10
# The eye counts as open while the aperture is at or above this value.
BLINK_APERTURE_THRESHOLD: Fraction = 0.5
# The eye counts as closed for PERCLOS purposes while the aperture is below this value.
CLOSED_APERTURE_THRESHOLD: Fraction = 0.25

# Frame-difference motion classification
MOTION_ANALYSIS_WINDOW: Seconds = 5
MINIMUM_DIFF_SCORES_FOR_MOTION = 5
STILL_MOTION_SCORE_THRESHOLD: Fraction = 0.002
ERRATIC_MOTION_SCORE_THRESHOLD: Fraction = 0.05

# Head nod detection from accelerometer pitch
NOD_MINIMUM_AMPLITUDE: Degrees = 10
NOD_REFRACTORY_PERIOD: Seconds = 1.0
NOD_BASELINE_WINDOW: Seconds = 5
MINIMUM_NOD_SERIES_DURATION: Seconds = 2
NOD_ANALYSIS_WINDOW: Seconds = 10

# The driver counts as active in the cabin if the PIR sensor fired within this horizon.
PIR_ACTIVITY_WINDOW: Seconds = 10

# PPG peak detection
PPG_PEAK_THRESHOLD = 0.4
PPG_PEAK_REFRACTORY_PERIOD: Seconds = 0.3
MINIMUM_PPG_DURATION: Seconds = 1.0
BPM_WINDOW: Seconds = 15
# Vitality bands
BRADYCARDIA_BELOW: BeatsPerMinute = 50
TACHYCARDIA_ABOVE: BeatsPerMinute = 120
# Below this variance, a PPG window without peaks is considered a flatline.
FLATLINE_VARIANCE_FLOOR = 0.001

# Fusion windows and dwell hysteresis
FUSION_WINDOW: Seconds = 1
FUSION_DWELL_UP_WINDOWS = 3
FUSION_DWELL_DOWN_WINDOWS = 2
DROWSY_CLOSED_FRACTION: Fraction = 0.3
SLEEPY_CLOSED_FRACTION: Fraction = 0.6
ASLEEP_CLOSED_FRACTION: Fraction = 0.9
DROWSY_MAXIMUM_BLINK_RATE: BlinksPerMinute = 8
SLEEPY_MINIMUM_NOD_RATE: NodsPerMinute = 6

# Escalation protocol
ALARM_RESPONSE_TIMEOUT: Seconds = 10
HR_CHECK_DURATION: Seconds = 5
SERVICE_DECELERATION: MetersPerSecondSquared = 0.5
INITIAL_TRAIN_SPEED: KilometersPerHour = 100

# An alarm counts as false if no scripted fatigue condition at or above the trigger severity was active within this
# horizon before the alarm.
FALSE_ALARM_LOOKBACK: Seconds = 15

# Status reports carry Unix timestamps relative to this simulated start instant.
DEFAULT_SCENARIO_START_TIME = "2024-01-01T00:00:00+00:00"

# Three-process model of alertness. Values follow the published model: homeostatic asymptotes 2.4 / 14.3,
# wake decay 0.0353/h, sleep recovery 0.381/h, a 2.5-unit circadian cosine peaking at 16:48, and sleep inertia of
# -5.72 units decaying at 1.51/h (gone within about two hours of waking).
CIRCADIAN_MESOR: AlertnessUnits = 0.0
CIRCADIAN_AMPLITUDE: AlertnessUnits = 2.5
CIRCADIAN_ACROPHASE: ClockHours = 16.8
HOMEOSTATIC_WAKE_DECAY_RATE: PerHour = 0.0353
HOMEOSTATIC_LOW_ASYMPTOTE: AlertnessUnits = 2.4
HOMEOSTATIC_SLEEP_RECOVERY_RATE: PerHour = 0.381
HOMEOSTATIC_HIGH_ASYMPTOTE: AlertnessUnits = 14.3
SLEEP_INERTIA_MAGNITUDE: AlertnessUnits = -5.72
SLEEP_INERTIA_TIME_CONSTANT: Hours = 1 / 1.51
# Resolution of the alertness curve emitted by the CLI
ALERTNESS_CURVE_STEP_MINUTES = 15
