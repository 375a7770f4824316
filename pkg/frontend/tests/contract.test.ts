import { beforeEach, describe, expect, it } from 'vitest';
import { createApi } from '../src/api';
import { createStore, type Store } from '../src/store';
import { STAGES, type Project, type StageKey } from '../src/types';
import { createWizard } from '../src/ui/wizard';
import { click, q, until } from './helpers';
import { SERVICE_URL } from './service';

const api = createApi(SERVICE_URL);
const ELEMENT_STAGES: StageKey[] = ['characters', 'plots', 'scenes', 'dialogues'];

function project(store: Store): Project {
  const current = store.get().project;
  if (!current) throw new Error('no project in store');
  return current;
}

async function mountWizard(logline: string, title: string) {
  const root = document.createElement('div');
  document.body.appendChild(root);
  const store = createStore();
  const created = await api.createProject({ title, logline_draft: logline });
  store.set({ project: created, staleness: await api.staleness(created.id) });
  createWizard(root, api, store);
  return { root, store, id: created.id };
}

describe('scripted session against the mock-provider service', () => {
  beforeEach(() => {
    document.body.innerHTML = '';
  });

  it('walks all five stages, flags staleness after an upstream edit, and mirrors the diff endpoint', async () => {
    const { root, store, id } = await mountWizard(
      'A shy lighthouse keeper teaches the tide to sing.',
      'Contract run',
    );

    // stage 1: the typed logline is confirmed from its card
    click(root, '.action-confirm');
    await until(
      () => project(store).stage_status.logline.state === 'confirmed',
      'logline confirmed',
    );

    // stages 2-5: generate a draft, then confirm it
    for (const stage of ELEMENT_STAGES) {
      click(root, `nav button[data-stage="${stage}"]`);
      click(root, '.action-generate');
      await until(() => project(store).stage_status[stage].state === 'draft', `${stage} draft`);
      expect(project(store)[stage as Exclude<StageKey, 'logline'>].length).toBeGreaterThan(0);
      click(root, '.action-confirm');
      await until(
        () => project(store).stage_status[stage].state === 'confirmed',
        `${stage} confirmed`,
      );
    }
    for (const stage of STAGES) {
      expect(project(store).stage_status[stage].state).toBe('confirmed');
    }
    expect(store.get().staleness).toEqual(await api.staleness(id));

    // upstream edit: rewrite the confirmed logline from its card
    click(root, 'nav button[data-stage="logline"]');
    const textarea = q<HTMLTextAreaElement>(
      root,
      '.element-card[data-element-id="logline"] textarea',
    );
    textarea.value = 'A bold lighthouse keeper teaches the storm to sing.';
    click(root, '.element-card[data-element-id="logline"] .card-save');
    await until(() => store.get().staleness?.characters === 'stale', 'characters stale');

    // every step's badge agrees with the staleness endpoint
    const flags = await api.staleness(id);
    for (const stage of STAGES) {
      click(root, `nav button[data-stage="${stage}"]`);
      const badge = q<HTMLSpanElement>(root, '.workspace-head .badge');
      expect(badge.getAttribute('data-flag')).toBe(flags[stage]);
    }
    click(root, 'nav button[data-stage="characters"]');
    expect(q(root, '.workspace-head .badge').textContent).toBe('Stale');

    // the diff view renders exactly what the diff endpoint reports
    click(root, '.action-diff');
    await until(() => !!root.querySelector('.diff-slot .diff-metrics'), 'diff view rendered');
    const report = await api.diff(id, 'characters');
    const metrics = [
      'absolute_distance',
      'normalized_distance',
      'deleted_length',
      'inserted_length',
      'jaccard',
    ] as const;
    for (const key of metrics) {
      expect(q(root, `.diff-slot dd[data-metric="${key}"]`).textContent).toBe(String(report[key]));
    }
    expect(q(root, '.diff-slot .diff-base').textContent).toBe(report.base_text);
    expect(q(root, '.diff-slot .diff-current').textContent).toBe(report.current_text);
  });

  it('adds and removes element cards through the confirm endpoint', async () => {
    const { root, store } = await mountWizard(
      'Two rival bakers inherit one oven.',
      'Card edits',
    );
    click(root, '.action-confirm');
    await until(
      () => project(store).stage_status.logline.state === 'confirmed',
      'logline confirmed',
    );
    click(root, 'nav button[data-stage="characters"]');
    click(root, '.action-generate');
    await until(() => project(store).characters.length > 0, 'characters generated');

    const before = project(store).characters.map((c) => c.name);
    const victim = project(store).characters[before.length - 1].id;
    click(root, `.element-card[data-element-id="${victim}"] .card-delete`);
    await until(() => project(store).characters.length === before.length - 1, 'card removed');
    expect(project(store).characters.map((c) => c.name)).toEqual(before.slice(0, -1));

    click(root, '.card-add');
    await until(() => project(store).characters.length === before.length, 'card added');
    const names = project(store).characters.map((c) => c.name);
    expect(names.slice(0, -1)).toEqual(before.slice(0, -1));
    expect(names[names.length - 1]).toContain('New character');
  });

  it('keeps the tutor conversation beside the cards without touching the script', async () => {
    const { root, store } = await mountWizard(
      'A night bus route that only exists on paper.',
      'Tutor chat',
    );
    const revisionBefore = project(store).revision;

    const input = q<HTMLInputElement>(root, '.chat-panel input');
    input.value = 'Is this logline too vague?';
    q<HTMLFormElement>(root, '.chat-panel form').dispatchEvent(
      new Event('submit', { bubbles: true, cancelable: true }),
    );
    await until(() => (store.get().chat.logline ?? []).length === 2, 'tutor replied');

    const turns = store.get().chat.logline!;
    expect(turns.map((t) => t.role)).toEqual(['user', 'tutor']);
    expect(q(root, '.chat-messages .chat-tutor').textContent).toBe(turns[1].text);

    const fresh = await api.getProject(project(store).id);
    expect(fresh.revision).toBe(revisionBefore);
  });
});
