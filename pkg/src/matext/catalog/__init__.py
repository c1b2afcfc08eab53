"""Named matroids, sparse paving enumeration and isomorphism classes."""
