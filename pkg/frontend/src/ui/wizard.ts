import { ApiError, type Api } from '../api.js';
import type { Store } from '../store.js';
import type { Project, StageKey } from '../types.js';
import { STAGES } from '../types.js';
import { createChatPanel } from './chat.js';
import { renderDiffView } from './diff-view.js';
import { renderElementCards } from './element-cards.js';
import { makeStalenessBadge } from './staleness-badge.js';

const TITLES: Record<StageKey, string> = {
  logline: 'Logline',
  characters: 'Characters',
  plots: 'Plot points',
  scenes: 'Scenes',
  dialogues: 'Dialogue',
};

export function upstreamConfirmed(project: Project, stage: StageKey): boolean {
  for (const earlier of STAGES.slice(0, STAGES.indexOf(stage))) {
    if (project.stage_status[earlier].state !== 'confirmed') return false;
  }
  return true;
}

/** Confirm is offered only under a fully confirmed upstream, and only
 * when the stage has content to bless. */
export function canConfirm(project: Project, stage: StageKey): boolean {
  return upstreamConfirmed(project, stage) && project.stage_status[stage].state !== 'empty';
}

/** The logline is typed, never generated; later stages need their
 * upstream confirmed first. */
export function canGenerate(project: Project, stage: StageKey): boolean {
  return stage !== 'logline' && upstreamConfirmed(project, stage);
}

export function stageReachable(project: Project, stage: StageKey): boolean {
  return upstreamConfirmed(project, stage) || project.stage_status[stage].state !== 'empty';
}

export function hasGeneratedDraft(project: Project, stage: StageKey): boolean {
  return project.revision_log.some((e) => e.stage === stage && e.kind === 'generate');
}

function toPayload(element: Record<string, unknown>): Record<string, unknown> {
  const copy = { ...element };
  delete copy.ordinal; // the service reissues positional ordinals
  return copy;
}

function newElement(project: Project, stage: Exclude<StageKey, 'logline'>): Record<string, unknown> {
  const n = project[stage].length + 1;
  if (stage === 'characters') {
    return { name: `New character ${n}`, personality: 'to be written', background: 'to be written' };
  }
  if (stage === 'plots') {
    return {
      title: `New plot point ${n}`,
      summary: 'to be written',
      involved_character_ids: project.characters.slice(0, 1).map((c) => c.id),
    };
  }
  if (stage === 'scenes') {
    const plot = project.plots[0];
    return {
      setting: `new setting ${n}`,
      time: 'day',
      plot_ids: plot ? [plot.id] : [],
      participant_ids: plot ? plot.involved_character_ids.slice(0, 1) : [],
    };
  }
  const scene = project.scenes[0];
  return {
    scene_id: scene ? scene.id : '',
    speaker_id: scene ? scene.participant_ids[0] : '',
    line: `New line ${n}`,
  };
}

export interface WizardActions {
  select(index: number): void;
  generate(stage: StageKey): Promise<void>;
  confirm(stage: StageKey): Promise<void>;
  sendChat(stage: StageKey, text: string): Promise<void>;
  edit(elementId: string, patch: Record<string, unknown>): Promise<void>;
  addElement(stage: StageKey): Promise<void>;
  deleteElement(stage: StageKey, elementId: string): Promise<void>;
  showDiff(stage: StageKey): Promise<void>;
  refresh(): Promise<void>;
}

export function createWizard(root: HTMLElement, api: Api, store: Store): WizardActions {
  const container = document.createElement('div');
  container.className = 'wizard';

  const nav = document.createElement('nav');
  nav.className = 'wizard-nav';

  const banner = document.createElement('div');
  banner.className = 'error-banner';
  banner.setAttribute('hidden', '');

  const content = document.createElement('section');
  content.className = 'wizard-content';

  container.appendChild(nav);
  container.appendChild(banner);
  container.appendChild(content);
  root.appendChild(container);

  async function withProject(work: () => Promise<Project>): Promise<void> {
    const { project } = store.get();
    if (!project) return;
    store.set({ pending: true });
    try {
      const updated = await work();
      const staleness = await api.staleness(updated.id);
      store.set({ project: updated, staleness, pending: false, error: null });
    } catch (err) {
      if (err instanceof ApiError && err.code === 'REVISION_CONFLICT') {
        store.set({ pending: false, error: 'Someone else changed the project. Reload to continue.' });
      } else if (err instanceof ApiError) {
        store.set({ pending: false, error: `${err.code}: ${err.message}` });
      } else {
        store.set({ pending: false, error: String(err) });
      }
    }
  }

  const actions: WizardActions = {
    select(index: number) {
      store.set({ stepIndex: index });
    },

    async refresh() {
      const { project } = store.get();
      if (!project) return;
      const fresh = await api.getProject(project.id);
      const staleness = await api.staleness(project.id);
      store.set({ project: fresh, staleness, error: null });
    },

    generate(stage) {
      return withProject(() => {
        const revision = store.get().project!.revision;
        return api.generate(store.get().project!.id, stage, { expected_revision: revision });
      });
    },

    confirm(stage) {
      return withProject(() => {
        const revision = store.get().project!.revision;
        return api.confirm(store.get().project!.id, stage, { expected_revision: revision });
      });
    },

    async sendChat(stage, text) {
      const { project } = store.get();
      if (!project) return;
      try {
        const response = await api.tutor(project.id, stage, text);
        store.set({
          chat: { ...store.get().chat, [stage]: response.session.messages },
          error: null,
        });
      } catch (err) {
        store.set({ error: err instanceof ApiError ? `${err.code}: ${err.message}` : String(err) });
      }
    },

    edit(elementId, patch) {
      return withProject(() => {
        const project = store.get().project!;
        return api.patchElement(project.id, elementId, patch, project.revision);
      });
    },

    addElement(stage) {
      return withProject(() => {
        const project = store.get().project!;
        if (stage === 'logline') throw new Error('the logline is a single text');
        const payload = [...project[stage].map((el) => toPayload(el as unknown as Record<string, unknown>)), newElement(project, stage)];
        return api.confirm(project.id, stage, { payload, expected_revision: project.revision });
      });
    },

    deleteElement(stage, elementId) {
      return withProject(() => {
        const project = store.get().project!;
        if (stage === 'logline') throw new Error('the logline cannot be deleted');
        const payload = project[stage]
          .filter((el) => el.id !== elementId)
          .map((el) => toPayload(el as unknown as Record<string, unknown>));
        return api.confirm(project.id, stage, { payload, expected_revision: project.revision });
      });
    },

    async showDiff(stage) {
      const { project } = store.get();
      if (!project) return;
      try {
        const report = await api.diff(project.id, stage);
        const slot = content.querySelector<HTMLElement>('.diff-slot');
        if (slot) renderDiffView(slot, report);
      } catch (err) {
        store.set({ error: err instanceof ApiError ? `${err.code}: ${err.message}` : String(err) });
      }
    },
  };

  function renderWorkspace(stage: StageKey): HTMLElement {
    const state = store.get();
    const project = state.project!;
    const workspace = document.createElement('div');
    workspace.className = 'workspace';

    const head = document.createElement('header');
    head.className = 'workspace-head';
    const title = document.createElement('h2');
    title.textContent = TITLES[stage];
    head.appendChild(title);
    if (state.staleness) head.appendChild(makeStalenessBadge(state.staleness[stage]));
    workspace.appendChild(head);

    const body = document.createElement('div');
    body.className = 'workspace-body';

    const chat = createChatPanel((text) => void actions.sendChat(stage, text));
    chat.render(state.chat[stage] ?? []);
    body.appendChild(chat.element);

    const editor = document.createElement('div');
    editor.className = 'editor';

    const cards = document.createElement('div');
    cards.className = 'cards';
    renderElementCards(cards, project, stage, {
      onEdit: (elementId, patch) => void actions.edit(elementId, patch),
      onDelete: (elementId) => void actions.deleteElement(stage, elementId),
      onAdd: () => void actions.addElement(stage),
    });
    editor.appendChild(cards);

    const bar = document.createElement('div');
    bar.className = 'actions';
    if (canGenerate(project, stage)) {
      const generate = document.createElement('button');
      generate.className = 'action-generate';
      generate.textContent = project.stage_status[stage].state === 'empty' ? 'Generate' : 'Regenerate';
      generate.disabled = state.pending;
      generate.addEventListener('click', () => void actions.generate(stage));
      bar.appendChild(generate);
    }
    if (canConfirm(project, stage)) {
      const confirm = document.createElement('button');
      confirm.className = 'action-confirm';
      confirm.textContent = 'Confirm';
      confirm.disabled = state.pending;
      confirm.addEventListener('click', () => void actions.confirm(stage));
      bar.appendChild(confirm);
    }
    if (hasGeneratedDraft(project, stage)) {
      const diff = document.createElement('button');
      diff.className = 'action-diff';
      diff.textContent = 'Compare with first draft';
      diff.addEventListener('click', () => void actions.showDiff(stage));
      bar.appendChild(diff);
    }
    editor.appendChild(bar);

    const diffSlot = document.createElement('div');
    diffSlot.className = 'diff-slot';
    editor.appendChild(diffSlot);

    body.appendChild(editor);
    workspace.appendChild(body);
    return workspace;
  }

  function sync() {
    const state = store.get();
    banner.innerHTML = '';
    if (state.error) {
      banner.removeAttribute('hidden');
      banner.textContent = state.error;
      const reload = document.createElement('button');
      reload.textContent = 'Reload';
      reload.addEventListener('click', () => void actions.refresh());
      banner.appendChild(reload);
    } else {
      banner.setAttribute('hidden', '');
    }

    nav.innerHTML = '';
    content.innerHTML = '';
    if (!state.project) {
      content.textContent = 'Loading project...';
      return;
    }

    STAGES.forEach((stage, index) => {
      const button = document.createElement('button');
      button.textContent = `${index + 1}. ${TITLES[stage]}`;
      button.setAttribute('data-stage', stage);
      const reachable = stageReachable(state.project!, stage);
      button.disabled = !reachable;
      if (index === state.stepIndex) button.classList.add('active');
      button.addEventListener('click', () => {
        if (reachable) actions.select(index);
      });
      nav.appendChild(button);
    });

    content.appendChild(renderWorkspace(STAGES[state.stepIndex]));
  }

  sync();
  store.subscribe(sync);
  return actions;
}
