import { describe, expect, it } from 'vitest';
import type { Api } from '../src/api';
import { createStore } from '../src/store';
import { STAGES, type StageKey, type StageState } from '../src/types';
import {
  canConfirm,
  canGenerate,
  createWizard,
  stageReachable,
  upstreamConfirmed,
} from '../src/ui/wizard';
import { syntheticProject } from './helpers';

// Rendering never reaches the network here; any call is a test failure.
const deadApi = new Proxy(
  {},
  {
    get: (_target, prop) => {
      if (prop === 'base') return 'unused';
      return () => {
        throw new Error(`unexpected api call: ${String(prop)}`);
      };
    },
  },
) as Api;

const STATES: StageState[] = ['empty', 'draft', 'confirmed'];

function* allStatePatterns(): Generator<Record<StageKey, StageState>> {
  const total = STATES.length ** STAGES.length;
  for (let index = 0; index < total; index++) {
    let rest = index;
    const pattern = {} as Record<StageKey, StageState>;
    for (const stage of STAGES) {
      pattern[stage] = STATES[rest % STATES.length];
      rest = Math.floor(rest / STATES.length);
    }
    yield pattern;
  }
}

describe('stage gating', () => {
  it('derives confirm/generate/reach from upstream confirmation', () => {
    for (const pattern of allStatePatterns()) {
      const project = syntheticProject(pattern);
      for (const [index, stage] of STAGES.entries()) {
        const upstreamOk = STAGES.slice(0, index).every((s) => pattern[s] === 'confirmed');
        expect(upstreamConfirmed(project, stage)).toBe(upstreamOk);
        expect(canConfirm(project, stage)).toBe(upstreamOk && pattern[stage] !== 'empty');
        expect(canGenerate(project, stage)).toBe(upstreamOk && stage !== 'logline');
        expect(stageReachable(project, stage)).toBe(upstreamOk || pattern[stage] !== 'empty');
      }
    }
  });

  it('never renders a Confirm control while any upstream stage is unconfirmed', () => {
    for (const pattern of allStatePatterns()) {
      const project = syntheticProject(pattern);
      for (const [index, stage] of STAGES.entries()) {
        const upstreamOk = STAGES.slice(0, index).every((s) => pattern[s] === 'confirmed');
        const root = document.createElement('div');
        const store = createStore();
        store.set({ project, stepIndex: index });
        createWizard(root, deadApi, store);

        const confirm = root.querySelector('.action-confirm');
        const generate = root.querySelector('.action-generate');
        if (!upstreamOk) {
          expect(confirm, `confirm leaked for ${stage} under ${JSON.stringify(pattern)}`).toBeNull();
          expect(generate, `generate leaked for ${stage} under ${JSON.stringify(pattern)}`).toBeNull();
        } else {
          expect(confirm !== null).toBe(pattern[stage] !== 'empty');
          expect(generate !== null).toBe(stage !== 'logline');
        }

        const navButton = root.querySelector<HTMLButtonElement>(`nav button[data-stage="${stage}"]`);
        expect(navButton?.disabled).toBe(!(upstreamOk || pattern[stage] !== 'empty'));
      }
    }
  });
});
