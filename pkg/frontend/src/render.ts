// DOM construction. Every function builds fresh elements from data; no
// hidden state lives in the DOM.

import { bandClass } from './bands.js';
import type { FinalReport, ItemDetail, QueueItem } from './types.js';

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function scoreCell(value: number | null): HTMLTableCellElement {
  const cell = el('td', `score ${bandClass(value)}`);
  cell.textContent = value === null ? '—' : value.toFixed(2);
  return cell;
}

export function renderQueueTable(
  items: QueueItem[],
  selectedId: string | null,
  onSelect: (id: string) => void,
): HTMLElement {
  if (items.length === 0) {
    return el('p', 'empty-state', 'No items in the queue.');
  }
  const table = el('table', 'queue');
  const head = el('thead');
  const headRow = el('tr');
  for (const label of ['Package', 'File', 'Malware', 'Risk', 'Confidence', 'Obfuscated', 'Verdict']) {
    headRow.appendChild(el('th', undefined, label));
  }
  head.appendChild(headRow);
  table.appendChild(head);

  const body = el('tbody');
  for (const item of items) {
    const row = el('tr', `queue-row ${bandClass(item.malware)}`);
    row.dataset.id = item.id;
    if (item.id === selectedId) row.classList.add('selected');
    row.appendChild(el('td', 'pkg', `${item.package}@${item.version}`));
    row.appendChild(el('td', 'file', item.file_path));
    row.appendChild(scoreCell(item.malware));
    row.appendChild(scoreCell(item.security_risk));
    row.appendChild(scoreCell(item.confidence));
    row.appendChild(scoreCell(item.obfuscated));
    const verdict = el('td', 'verdict');
    if (item.reviewer_verdict) {
      verdict.appendChild(el('span', `badge verdict-${item.reviewer_verdict}`, item.reviewer_verdict));
    } else if (item.outcome !== 'analyzed') {
      verdict.appendChild(el('span', 'badge badge-muted', item.outcome));
    }
    row.appendChild(verdict);
    row.addEventListener('click', () => onSelect(item.id));
    body.appendChild(row);
  }
  table.appendChild(body);
  return table;
}

function textSection(
  title: string,
  value: string,
  report: FinalReport,
  fieldKey: string,
): HTMLElement {
  const section = el('section', 'report-field');
  const heading = el('h4', undefined, title);
  const violated = report.violations.filter(
    (v) =>
      (v.kind === 'placeholder_text' || v.kind === 'missing_key_defaulted') &&
      v.detail.startsWith(fieldKey),
  );
  for (const note of violated) {
    heading.appendChild(el('span', 'badge badge-warning', note.kind.replace(/_/g, ' ')));
  }
  section.appendChild(heading);
  section.appendChild(el('p', undefined, value.trim() === '' ? '—' : value));
  return section;
}

export function renderDetail(item: ItemDetail): HTMLElement {
  const panel = el('div', 'detail');
  panel.appendChild(el('h3', undefined, `${item.package}@${item.version} — ${item.file_path}`));

  if (item.detail.skipped !== null) {
    panel.appendChild(el('p', 'skip-reason', `Skipped: ${item.detail.skipped}`));
    return panel;
  }
  if (item.detail.failed !== null) {
    panel.appendChild(el('p', 'fail-reason', `Failed: ${item.detail.failed}`));
    return panel;
  }
  const report = item.detail.final_report;
  if (!report) {
    panel.appendChild(el('p', 'empty-state', 'No final report available.'));
    return panel;
  }

  const summary = el('div', 'report-summary');
  summary.appendChild(textSection('Purpose', report.purpose, report, 'purpose'));
  summary.appendChild(textSection('Conclusion', report.conclusion, report, 'conclusion'));
  panel.appendChild(summary);

  const scores = el('p', 'score-line');
  scores.textContent =
    `malware ${report.malware.toFixed(2)} · risk ${report.securityRisk.toFixed(2)} · ` +
    `confidence ${report.confidence.toFixed(2)} · obfuscated ${report.obfuscated.toFixed(2)}`;
  scores.classList.add(bandClass(report.malware));
  panel.appendChild(scores);

  for (const [title, key] of [
    ['Sources', 'sources'],
    ['Sinks', 'sinks'],
    ['Flows', 'flows'],
    ['Anomalies', 'anomalies'],
    ['Analysis', 'analysis'],
  ] as const) {
    panel.appendChild(textSection(title, report[key], report, key));
  }

  if (item.detail.prescreen_findings.length > 0) {
    const section = el('section', 'findings');
    section.appendChild(el('h4', undefined, 'Pre-screen findings'));
    const list = el('ul');
    for (const finding of item.detail.prescreen_findings) {
      const li = el('li');
      li.appendChild(el('code', undefined, `${finding.rule_id} L${finding.line}`));
      li.appendChild(el('span', 'category', ` ${finding.category}: `));
      li.appendChild(el('code', 'excerpt', finding.excerpt));
      list.appendChild(li);
    }
    section.appendChild(list);
    panel.appendChild(section);
  }
  return panel;
}

export function renderError(message: string, onRetry: () => void): HTMLElement {
  const box = el('div', 'error-state');
  box.appendChild(el('p', undefined, message));
  const retry = el('button', 'retry', 'Retry');
  retry.addEventListener('click', onRetry);
  box.appendChild(retry);
  return box;
}

export function renderOverwriteConfirm(
  verdict: string,
  onConfirm: () => void,
  onCancel: () => void,
): HTMLElement {
  const bar = el('div', 'confirm-overwrite');
  bar.appendChild(
    el('span', undefined, `A verdict is already recorded for this item. Overwrite with "${verdict}"?`),
  );
  const yes = el('button', 'confirm', 'Overwrite');
  yes.addEventListener('click', onConfirm);
  const no = el('button', 'cancel', 'Cancel');
  no.addEventListener('click', onCancel);
  bar.appendChild(yes);
  bar.appendChild(no);
  return bar;
}

export function renderToast(message: string): HTMLElement {
  return el('div', 'toast', message);
}
