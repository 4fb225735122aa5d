// Replay state machine for stepping through a packing order. Pure data +
// transitions so the gating rule (no verdict before the whole sequence has
// been shown) is trivially testable.

export interface ReplayState {
  readonly sequence: readonly string[];
  /** Number of revealed steps, 0..sequence.length. */
  readonly shown: number;
}

export function newReplay(sequence: readonly string[]): ReplayState {
  return { sequence, shown: 0 };
}

export function step(state: ReplayState): ReplayState {
  if (state.shown >= state.sequence.length) return state;
  return { sequence: state.sequence, shown: state.shown + 1 };
}

export function isComplete(state: ReplayState): boolean {
  return state.shown >= state.sequence.length;
}

/** Object ids revealed so far, in replay order. */
export function revealed(state: ReplayState): readonly string[] {
  return state.sequence.slice(0, state.shown);
}

/** The most recently revealed object id, if any. */
export function currentObject(state: ReplayState): string | null {
  return state.shown > 0 ? (state.sequence[state.shown - 1] ?? null) : null;
}

export function verdictEnabled(state: ReplayState): boolean {
  return isComplete(state);
}
