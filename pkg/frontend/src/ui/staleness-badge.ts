import type { StalenessFlag } from '../types.js';

const LABELS: Record<StalenessFlag, string> = {
  empty: 'Empty',
  fresh: 'Fresh',
  stale: 'Stale',
};

export function makeStalenessBadge(flag: StalenessFlag): HTMLSpanElement {
  const badge = document.createElement('span');
  badge.className = `badge badge-${flag}`;
  badge.textContent = LABELS[flag];
  badge.setAttribute('data-flag', flag);
  return badge;
}
