from .blockmatch import BlockNormImage, DistanceMap, Matches, MatchTable, FFT_METHOD, NAIVE_METHOD, block_norms, \
    candidate_bounds, distance_map, naive_distance_map, top_k, gather_blocks, build_match_table
