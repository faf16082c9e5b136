"""
The pitfall gallery
===================

Each scenario manufactures data on which a measure or benchmark choice
misleads, then checks the failure actually shows: an ordering inversion, a
bound being hit, or a distortion in a known direction. Run them all and
read the evidence.
"""

from forevalkit import list_scenarios, run_scenario

for scenario in list_scenarios():
    print(f"== {scenario.name}  [{scenario.topic}]")
    print(f"   {scenario.description}")
    result = run_scenario(scenario.name)
    print(f"   verdict: {'holds' if result.passed else 'DID NOT REPRODUCE'}")
    for key, value in result.evidence.items():
        if isinstance(value, float):
            print(f"     {key} = {value:.4f}")
        else:
            print(f"     {key} = {value}")
    print()
