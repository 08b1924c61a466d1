"""Object-goal navigation in a procedural grid world.

Agents observe per-class context vectors from a simulated detector, mix them
with a contextualized graph convolution over an object-relation graph, and
train with asynchronous advantage actor-critic under parent-proximity reward
shaping.  Evaluation reports success rate and path-length-weighted success.
"""

__version__ = "0.1.0"
