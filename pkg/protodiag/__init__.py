from protodiag.utils.logging import setup_logging

setup_logging()
