"""Transceiver design and simulation for a wireless-powered cooperative
NOMA downlink: a multi-antenna source serves a strong user (which doubles as
an energy-harvesting decode-and-forward relay) and a weak user, and the
package maximizes the strong user's rate subject to the weak user's QoS by
jointly designing transmit beamformers, the power-splitting ratio, and the
relay receive filter.
"""

__version__ = "0.1.0"
