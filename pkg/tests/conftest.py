import textwrap

import pytest


SIS_FAST_CONFIG = """\
[run]
id = "sis_test"

[model]
kind = "sis"
dt = 0.1
horizon = 80.0

[targets]
builtin = "sis_case_study"

[[priors.parameters]]
name = "c"
kind = "normal"
mu = 9.0
sigma = 1.0

[[priors.parameters]]
name = "p"
kind = "normal"
mu = 0.06
sigma = 0.01

[[priors.parameters]]
name = "d"
kind = "improper_uniform"
lower = 0.0
upper = 100.0
init_lower = 2.0
init_upper = 20.0

[proposal]
scales = { c = 0.25, p = 0.0025, d = 0.25 }
block_size = 3

[sampler]
iterations = 400
burn_in = 100
thinning = 3
seeds = [11, 22]

[output]
directory = "out"
"""


@pytest.fixture
def write_config(tmp_path):
    def _write(text, name="run.toml"):
        path = tmp_path / name
        path.write_text(textwrap.dedent(text))
        return path

    return _write


@pytest.fixture
def sis_fast_config(write_config):
    return write_config(SIS_FAST_CONFIG)
