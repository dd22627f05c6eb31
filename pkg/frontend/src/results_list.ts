// Ranked-candidate side list. Every number is rendered verbatim from the
// API payload; the client never recomputes scores.

import { ResultJson } from './types.js';

const METRICS: (keyof ResultJson['metrics'])[] = ['w_d', 't_d', 'b_d', 's_p', 's_d', 'g_d'];

export function renderResultsList(
    container: HTMLElement,
    results: ResultJson[],
    onSelect?: (result: ResultJson) => void,
): void {
    container.replaceChildren();
    if (results.length === 0) {
        const empty = document.createElement('p');
        empty.className = 'no-match';
        empty.textContent = 'no match';
        container.appendChild(empty);
        return;
    }
    for (const result of results) {
        const row = document.createElement('div');
        row.className = `result-row ${result.precision_class}`;
        row.dataset.objectId = String(result.id);

        const head = document.createElement('div');
        head.className = 'result-head';
        head.textContent = `#${result.rank} ${result.name_historical}`;
        const score = document.createElement('span');
        score.className = 'score';
        score.textContent = result.score === null ? `error: ${result.score_error}` : String(result.score);
        head.appendChild(score);
        row.appendChild(head);

        const meta = document.createElement('div');
        meta.className = 'result-meta';
        meta.textContent =
            `${result.gazetteer} · ${result.source} · ${result.precision_class}` +
            ` · ±${String(result.accuracy_m)} m · [${result.period.join(', ')}]`;
        row.appendChild(meta);

        const metrics = document.createElement('dl');
        metrics.className = 'metric-breakdown';
        for (const name of METRICS) {
            const dt = document.createElement('dt');
            dt.textContent = name;
            const dd = document.createElement('dd');
            dd.textContent = String(result.metrics[name]);
            if (
                (name === 't_d' && !result.flags.t_d_available) ||
                (name === 'b_d' && !result.flags.number_compared) ||
                (name === 'g_d' && !result.flags.g_d_available)
            ) {
                dd.classList.add('not-compared');
                dd.title = 'not compared (missing on one side)';
            }
            metrics.append(dt, dd);
        }
        row.appendChild(metrics);
        if (onSelect) row.addEventListener('click', () => onSelect(result));
        container.appendChild(row);
    }
}
