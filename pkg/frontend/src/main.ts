import { createApi, type Api } from './api.js';
import { createStore, type Store } from './store.js';
import { createWizard, type WizardActions } from './ui/wizard.js';

/** Rebuilds the whole view from GET endpoints: the page holds no truth
 * of its own, so a reload lands on the same state every device sees. */
export async function boot(root: HTMLElement, api: Api, store: Store): Promise<WizardActions> {
  const summaries = await api.listProjects();
  const project = summaries.length
    ? await api.getProject(summaries[0].id)
    : await api.createProject({ title: 'Class play', logline_draft: '' });
  const staleness = await api.staleness(project.id);
  store.set({ project, staleness });
  return createWizard(root, api, store);
}

const mount = typeof document !== 'undefined' ? document.getElementById('app') : null;
if (mount) {
  void boot(mount, createApi(), createStore());
}
