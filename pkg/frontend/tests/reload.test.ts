import { beforeEach, describe, expect, it } from 'vitest';
import { createApi, type Api } from '../src/api';
import { boot } from '../src/main';
import { createStore } from '../src/store';
import { q, syntheticProject } from './helpers';
import { SERVICE_URL } from './service';

const api = createApi(SERVICE_URL);

describe('page reload', () => {
  beforeEach(() => {
    document.body.innerHTML = '';
  });

  it('reconstructs an identical view from GET endpoints alone', async () => {
    // leave some history behind so the rebuilt view is non-trivial
    const seeded = await api.createProject({
      title: 'Reload check',
      logline_draft: 'An archivist finds a letter addressed to next year.',
    });
    await api.confirm(seeded.id, 'logline', { expected_revision: seeded.revision });
    const generated = await api.generate(seeded.id, 'characters', {});
    await api.confirm(seeded.id, 'characters', { expected_revision: generated.revision });

    const rootA = document.createElement('div');
    const rootB = document.createElement('div');
    document.body.appendChild(rootA);
    document.body.appendChild(rootB);

    await boot(rootA, api, createStore());
    await boot(rootB, api, createStore());

    expect(rootA.innerHTML.length).toBeGreaterThan(0);
    expect(rootB.innerHTML).toBe(rootA.innerHTML);

    // both mounts landed on real server state, not an empty shell
    const summaries = await api.listProjects();
    const shown = await api.getProject(summaries[0].id);
    const textarea = q<HTMLTextAreaElement>(
      rootA,
      '.element-card[data-element-id="logline"] textarea',
    );
    expect(textarea.value).toBe(shown.logline.text);
  });

  it('reuses the first listed project instead of minting new ones', async () => {
    const summaries = await api.listProjects();
    expect(summaries.length).toBeGreaterThan(0);
    const root = document.createElement('div');
    document.body.appendChild(root);
    const store = createStore();
    await boot(root, api, store);
    expect(store.get().project?.id).toBe(summaries[0].id);
    expect((await api.listProjects()).length).toBe(summaries.length);
  });

  it('creates a shared project on first boot against an empty service', async () => {
    const fresh = syntheticProject({ logline: 'draft' });
    let created = 0;
    const stub = {
      listProjects: async () => [],
      createProject: async () => {
        created += 1;
        return fresh;
      },
      getProject: async () => {
        throw new Error('nothing to fetch on an empty service');
      },
      staleness: async () =>
        ({
          logline: 'fresh',
          characters: 'empty',
          plots: 'empty',
          scenes: 'empty',
          dialogues: 'empty',
        }) as const,
    } as unknown as Api;

    const root = document.createElement('div');
    document.body.appendChild(root);
    const store = createStore();
    await boot(root, stub, store);
    expect(created).toBe(1);
    expect(store.get().project).toBe(fresh);
    expect(root.querySelector('.element-card[data-element-id="logline"]')).not.toBeNull();
  });
});
