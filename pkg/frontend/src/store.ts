import type { Project, StageKey, Staleness, TutorTurn } from './types.js';

export interface UiState {
  project: Project | null;
  staleness: Staleness | null;
  stepIndex: number;
  chat: Partial<Record<StageKey, TutorTurn[]>>;
  pending: boolean;
  error: string | null;
}

export const initialState: UiState = {
  project: null,
  staleness: null,
  stepIndex: 0,
  chat: {},
  pending: false,
  error: null,
};

export function createStore(initial: UiState = initialState) {
  let state = { ...initial };
  const subscribers = new Set<() => void>();

  return {
    get(): UiState {
      return state;
    },
    set(patch: Partial<UiState>) {
      state = { ...state, ...patch };
      subscribers.forEach((fn) => fn());
    },
    subscribe(fn: () => void): () => void {
      subscribers.add(fn);
      return () => subscribers.delete(fn);
    },
  };
}

export type Store = ReturnType<typeof createStore>;
