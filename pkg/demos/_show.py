def show(state, limit=8):
    """Print the largest amplitudes of a state."""
    items = sorted(state.as_dict().items(), key=lambda kv: -abs(kv[1]))
    for occ, a in items[:limit]:
        print(f"    {a.real:+.6f}{a.imag:+.6f}j  |{state.modes.signature(occ) or 'vac'}>")
    if len(items) > limit:
        print(f"    ... {len(items) - limit} more components")
