import type { Project, StageElement, StageKey } from '../types.js';

export interface CardHandlers {
  onEdit(elementId: string, patch: Record<string, unknown>): void;
  onDelete(elementId: string): void;
  onAdd(): void;
}

const FIELDS: Record<Exclude<StageKey, 'logline'>, { name: string; long: boolean }[]> = {
  characters: [
    { name: 'name', long: false },
    { name: 'personality', long: true },
    { name: 'background', long: true },
  ],
  plots: [
    { name: 'title', long: false },
    { name: 'summary', long: true },
  ],
  scenes: [
    { name: 'setting', long: false },
    { name: 'time', long: false },
  ],
  dialogues: [
    { name: 'line', long: true },
    { name: 'note', long: false },
  ],
};

function cardLabel(project: Project, stage: StageKey, element: StageElement): string {
  if (stage === 'dialogues') {
    const line = element as Project['dialogues'][number];
    const speaker = project.characters.find((c) => c.id === line.speaker_id);
    return `${line.ordinal}. ${speaker ? speaker.name : line.speaker_id}`;
  }
  if ('ordinal' in element) return `${(element as { ordinal: number }).ordinal}.`;
  return '';
}

function makeCard(
  project: Project,
  stage: Exclude<StageKey, 'logline'>,
  element: StageElement,
  handlers: CardHandlers,
): HTMLElement {
  const card = document.createElement('article');
  card.className = 'element-card';
  card.setAttribute('data-element-id', element.id);

  const head = document.createElement('header');
  head.textContent = cardLabel(project, stage, element);
  card.appendChild(head);

  const inputs = new Map<string, HTMLInputElement | HTMLTextAreaElement>();
  for (const field of FIELDS[stage]) {
    const label = document.createElement('label');
    label.textContent = field.name;
    const input = field.long
      ? document.createElement('textarea')
      : document.createElement('input');
    input.value = String((element as unknown as Record<string, unknown>)[field.name] ?? '');
    input.setAttribute('data-field', field.name);
    inputs.set(field.name, input);
    label.appendChild(input);
    card.appendChild(label);
  }

  const save = document.createElement('button');
  save.textContent = 'Save';
  save.className = 'card-save';
  save.addEventListener('click', () => {
    const patch: Record<string, unknown> = {};
    for (const [name, input] of inputs) {
      const original = String((element as unknown as Record<string, unknown>)[name] ?? '');
      if (input.value !== original) patch[name] = input.value;
    }
    if (Object.keys(patch).length) handlers.onEdit(element.id, patch);
  });
  card.appendChild(save);

  const remove = document.createElement('button');
  remove.textContent = 'Delete';
  remove.className = 'card-delete';
  remove.addEventListener('click', () => handlers.onDelete(element.id));
  card.appendChild(remove);

  return card;
}

/**
 * Cards for one stage's elements. The logline gets a single editable
 * card; element stages get one card per element plus an Add button.
 */
export function renderElementCards(
  root: HTMLElement,
  project: Project,
  stage: StageKey,
  handlers: CardHandlers,
): void {
  root.innerHTML = '';

  if (stage === 'logline') {
    const card = document.createElement('article');
    card.className = 'element-card';
    card.setAttribute('data-element-id', 'logline');
    const input = document.createElement('textarea');
    input.value = project.logline.text;
    input.setAttribute('data-field', 'text');
    const save = document.createElement('button');
    save.textContent = 'Save';
    save.className = 'card-save';
    save.addEventListener('click', () => {
      if (input.value !== project.logline.text) handlers.onEdit('logline', { text: input.value });
    });
    card.appendChild(input);
    card.appendChild(save);
    root.appendChild(card);
    return;
  }

  for (const element of project[stage]) {
    root.appendChild(makeCard(project, stage, element, handlers));
  }

  const add = document.createElement('button');
  add.textContent = 'Add';
  add.className = 'card-add';
  add.addEventListener('click', () => handlers.onAdd());
  root.appendChild(add);
}
