import os

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Misc
PROJECT_NAME = "protodiag"
DEFAULT_OUTPUT_DIR = os.environ.get("PROTODIAG_OUTPUT_DIR", "runs")
RESOLVED_CONFIG_FILENAME = "resolved_config.yaml"
INVOCATION_SUFFIX = ".invocation.yaml"

# Signal windows
WINDOW_LENGTH = 2048
WINDOW_STEP = 80
DEFAULT_SAMPLE_RATE_HZ = 12000.0
SIGNAL_FILE_EXTS = {".f64", ".csv"}

# Feature extractor / heads
FEATURE_DIM = 100
PROTOTYPE_DIM = 5
DROPOUT_RATE = 0.5
PROTOTYPE_INIT_STD = 0.1

# Loss defaults
DEFAULT_GAMMA_D = 1.0
DEFAULT_GAMMA_S = 1.0
DEFAULT_LAMBDA = 0.5
DEFAULT_LAMBDA1 = 0.01
DEFAULT_LAMBDA2 = 0.01
DEFAULT_LAMBDA3 = 0.001
BCE_CLAMP = 1e-12

# AdaDelta
ADADELTA_RHO = 0.9
ADADELTA_EPSILON = 1e-6

# Training defaults
DEFAULT_BATCH_SIZE = 64
DEFAULT_EPOCHS = 50
DEFAULT_FINE_TUNE_EPOCHS = 20
DEFAULT_POSITIVE_FRACTION = 0.5
DEFAULT_TARGET_FRACTION = 0.25

# Checkpoints
CHECKPOINT_MAGIC = b"PDCK"
CHECKPOINT_VERSION = 1
