import type { Project, StageKey, StageState } from '../src/types';
import { STAGES } from '../src/types';

export async function until(cond: () => boolean, what: string, timeout = 15000): Promise<void> {
  const deadline = Date.now() + timeout;
  while (Date.now() < deadline) {
    if (cond()) return;
    await new Promise((resolve) => setTimeout(resolve, 25));
  }
  throw new Error(`timed out waiting for ${what}`);
}

export function q<T extends Element>(root: ParentNode, selector: string): T {
  const el = root.querySelector(selector);
  if (!el) throw new Error(`no element matches ${selector}`);
  return el as T;
}

export function click(root: ParentNode, selector: string): void {
  q<HTMLButtonElement>(root, selector).click();
}

/** A project literal with the given stage states and no elements; enough
 * for exercising control gating without a service round trip. */
export function syntheticProject(states: Partial<Record<StageKey, StageState>>): Project {
  const stage_status = {} as Project['stage_status'];
  for (const stage of STAGES) {
    stage_status[stage] = { state: states[stage] ?? 'empty', upstream_fingerprint: null };
  }
  const loglineState = states.logline ?? 'empty';
  return {
    id: 'synthetic',
    title: 'Synthetic',
    logline: {
      text: loglineState === 'empty' ? '' : 'A stubborn gardener argues with the seasons.',
      confirmed_at: loglineState === 'confirmed' ? '2024-05-05T00:00:00+00:00' : null,
    },
    characters: [],
    plots: [],
    scenes: [],
    dialogues: [],
    stage_status,
    revision: 1,
    revision_log: [],
    element_seq: 0,
  };
}
