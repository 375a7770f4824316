import type { DiffReport } from '../types.js';

const METRICS: [keyof DiffReport, string][] = [
  ['absolute_distance', 'edit distance'],
  ['normalized_distance', 'normalized'],
  ['deleted_length', 'deleted chars'],
  ['inserted_length', 'inserted chars'],
  ['jaccard', 'token overlap'],
];

/** First generated draft vs current text, with the drift numbers on top. */
export function renderDiffView(root: HTMLElement, report: DiffReport): void {
  root.innerHTML = '';
  const view = document.createElement('div');
  view.className = 'diff-view';

  const table = document.createElement('dl');
  table.className = 'diff-metrics';
  for (const [key, label] of METRICS) {
    const dt = document.createElement('dt');
    dt.textContent = label;
    const dd = document.createElement('dd');
    dd.setAttribute('data-metric', key);
    dd.textContent = String(report[key]);
    table.appendChild(dt);
    table.appendChild(dd);
  }
  view.appendChild(table);

  const panes = document.createElement('div');
  panes.className = 'diff-panes';
  const base = document.createElement('pre');
  base.className = 'diff-base';
  base.textContent = report.base_text;
  const current = document.createElement('pre');
  current.className = 'diff-current';
  current.textContent = report.current_text;
  panes.appendChild(base);
  panes.appendChild(current);
  view.appendChild(panes);

  root.appendChild(view);
}
