"""Attribute spaces, quantized shares, and occupancy-weighted distances
=====================================================================

Users and objects share one categorical schema. Every distance in the
library is relative to a reference population: the same two profiles can
be close in one building and far apart in another.
"""

from curalloc import (
    AttributeSchema,
    location_mode,
    quantize_object,
    quantize_user,
    rarity,
    raw_distance,
    weighted_distance,
)

# a two-dimensional demographic schema
schema = AttributeSchema(
    dimensions=(
        ("gender", ("man", "woman", "nonbinary")),
        ("region", ("north", "south", "east")),
    )
)

alice = schema.vector("woman", "east")
bob = schema.vector("man", "north")

# a building dominated by (man, north) profiles, with alice the lone outlier
occupants = [bob] * 9 + [alice]

print("Occupancy shares for alice:", quantize_user(alice, occupants).proportions)
print("Occupancy shares for bob:  ", quantize_user(bob, occupants).proportions)

# the building's per-dimension mode, and deviations from it
mode = location_mode(occupants)
print("\nBuilding mode:", schema.labels_of(mode))
print("alice's deviation from the mode:", weighted_distance(alice, mode, occupants))
print("bob's deviation from the mode:  ", weighted_distance(bob, mode, occupants))

# in a balanced building the same pair of profiles is indistinguishable:
# equal proportional shares contribute nothing to the metric
balanced = [bob] * 5 + [alice] * 5
print("\nIn a 50/50 building, d(alice, bob) =", weighted_distance(alice, bob, balanced))
print("In the 90/10 building, d(alice, bob) =", weighted_distance(alice, bob, occupants))

# raw mismatch distance ignores the population entirely
print("\nRaw mismatch distance alice-bob:", raw_distance(alice, bob))

# rarity: the product of an object's collection shares per dimension
collection = [bob] * 6 + [alice] * 1 + [schema.vector("woman", "north")] * 1
print("\nCollection share vector for alice-like art:",
      quantize_object(alice, collection).proportions)
print("rarity(alice-like art) =", rarity(alice, collection))
print("rarity(bob-like art)   =", rarity(bob, collection))
