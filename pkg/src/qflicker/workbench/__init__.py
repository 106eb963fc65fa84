"""Sample descriptors, run records and the command-line interface."""

from .descriptor import SampleDescriptor, emit, from_dict, ingest

__all__ = ["SampleDescriptor", "emit", "from_dict", "ingest"]
