import numpy as np
import pytest

from npce import Actor, ExplicitList, Scenario, TableUtility, VotingRule


def random_table_scenario(rng, n_actors=None, n_options=None, rule=VotingRule.PROPORTIONAL,
                          **kwargs) -> Scenario:
    """A random fully-tabular scenario; every option is held by some actor."""
    if n_actors is None:
        n_actors = int(rng.integers(2, 7))
    if n_options is None:
        n_options = n_actors
    issue_set = ExplicitList(tuple(f"o{i}" for i in range(n_options)))
    actors = []
    for k in range(n_actors):
        values = tuple(rng.random(n_options).tolist())
        actors.append(Actor(
            id=f"a{k}",
            capability=float(rng.uniform(0.1, 3.0)),
            position=int(k % n_options),
            utility=TableUtility(values),
        ))
    return Scenario(issue_set, tuple(actors), voting_rule=rule, **kwargs)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
