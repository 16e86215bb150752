import pathlib
SRC = pathlib.Path(__file__).parent
CONFIGS = SRC / "configs"
