// Application wiring: single-query panel, batch CSV panel, map, and the
// edit flow. Sessions are addressed by the ruid in the URL hash, so a
// bookmarked batch session is restorable any time.

import { Api } from './api.js';
import { parseCsv, toObjects } from './csv.js';
import { DateEditor } from './date_editor.js';
import { MapPane, Marker } from './map.js';
import { renderResultsList } from './results_list.js';
import { TileConfig } from './tiles.js';
import { ResultJson, ResultRecordJson } from './types.js';

export interface AppConfig {
    baseUrl?: string;
    tiles?: TileConfig;
    mapWidthPx?: number;
    mapHeightPx?: number;
}

interface RecordState {
    record: ResultRecordJson;
    requeryAddress: string;
    markerId: string;
    tableRow?: HTMLTableRowElement;
}

function markerRadius(accuracyM: number): number {
    return 4 + 0.5 * accuracyM; // strictly increasing in accuracy
}

function readFileText(file: File): Promise<string> {
    if (typeof file.text === 'function') return file.text();
    return new Promise((resolve, reject) => {
        const reader = new FileReader();
        reader.onload = () => resolve(String(reader.result));
        reader.onerror = () => reject(reader.error);
        reader.readAsText(file);
    });
}

export class App {
    readonly api: Api;
    readonly map: MapPane;
    readonly root: HTMLElement;
    ruid: string | null = null;
    records = new Map<number, RecordState>();
    lastBatchCsv: string | null = null;
    lastResults: ResultJson[] = [];

    private readonly resultsList: HTMLElement;
    private readonly statusLine: HTMLElement;
    private readonly batchTable: HTMLTableElement;
    private readonly editPanel: HTMLElement;
    private readonly editDate: DateEditor;
    private editTarget: number | null = null;

    constructor(root: HTMLElement, config: AppConfig = {}) {
        this.root = root;
        this.api = new Api(config.baseUrl ?? '');
        root.innerHTML = `
          <header><h1>historical geocoder</h1><span id="status-line"></span></header>
          <section id="single-panel">
            <h2>geocode one address</h2>
            <form id="single-form">
              <input id="single-address" placeholder="address, e.g. 12 rue du Temple, Paris" required>
              <input id="single-date" placeholder="date (1850, 1840-1860, a;b;c;d)">
              <input id="single-maxresults" type="number" value="3" min="1">
              <button id="single-submit" type="submit">geocode</button>
            </form>
          </section>
          <section id="batch-panel">
            <h2>batch CSV</h2>
            <input id="batch-file" type="file" accept=".csv,text/csv">
            <label>address column <input id="batch-address-column" value="address"></label>
            <button id="batch-open-map" disabled>open on map</button>
            <button id="batch-download" disabled>download enriched CSV</button>
            <div id="batch-table-wrap"><table id="batch-table"></table></div>
          </section>
          <section id="map-section">
            <div id="map-container"></div>
            <aside id="results-list"></aside>
          </section>
          <section id="edit-panel" hidden>
            <h2>edit candidate</h2>
            <label>x <input id="edit-x" type="number" step="any"></label>
            <label>y <input id="edit-y" type="number" step="any"></label>
            <div id="edit-date-host"></div>
            <label>historical name <input id="edit-historical"></label>
            <label>normalized name <input id="edit-normalized"></label>
            <label>note <input id="edit-note"></label>
            <button id="edit-apply">save edit</button>
            <button id="edit-cancel">cancel</button>
          </section>
        `;
        this.statusLine = root.querySelector('#status-line')!;
        this.resultsList = root.querySelector('#results-list')!;
        this.batchTable = root.querySelector('#batch-table')!;
        this.editPanel = root.querySelector('#edit-panel')!;
        this.editDate = new DateEditor();
        root.querySelector('#edit-date-host')!.appendChild(this.editDate.root);

        this.map = new MapPane(root.querySelector('#map-container')!, {
            widthPx: config.mapWidthPx,
            heightPx: config.mapHeightPx,
            tiles: config.tiles,
            onMarkerClick: (marker) => this.openEditor(marker),
            onMarkerDragEnd: (marker, x, y) => {
                void this.applyDragEdit(marker, x, y);
            },
        });

        root.querySelector('#single-form')!.addEventListener('submit', (event) => {
            event.preventDefault();
            void this.submitSingleFromForm();
        });
        root.querySelector('#batch-file')!.addEventListener('change', (event) => {
            const input = event.target as HTMLInputElement;
            const file = input.files?.[0];
            if (file) void readFileText(file).then((text) => this.submitBatchCsv(text));
        });
        root.querySelector('#batch-open-map')!.addEventListener('click', () => {
            if (this.ruid) void this.openRuid(this.ruid);
        });
        root.querySelector('#batch-download')!.addEventListener('click', () => this.download());
        root.querySelector('#edit-apply')!.addEventListener('click', () => {
            void this.submitEditorEdit();
        });
        root.querySelector('#edit-cancel')!.addEventListener('click', () => {
            this.editPanel.hidden = true;
        });

        const fromHash = new URLSearchParams(location.hash.replace(/^#/, '')).get('ruid');
        if (fromHash) void this.openRuid(fromHash);
    }

    private status(text: string): void {
        this.statusLine.textContent = text;
    }

    // ------------------------------------------------------------------
    // single query

    private async submitSingleFromForm(): Promise<void> {
        const address = (this.root.querySelector('#single-address') as HTMLInputElement).value;
        const date = (this.root.querySelector('#single-date') as HTMLInputElement).value;
        const maxresults = Number(
            (this.root.querySelector('#single-maxresults') as HTMLInputElement).value,
        );
        await this.submitSingle(address, date || undefined, maxresults);
    }

    async submitSingle(address: string, date?: string, maxresults = 3): Promise<void> {
        try {
            const response = await this.api.geocode({ address, date, maxresults, persist: true });
            this.showSingleResults(response.results, response.ruid ?? null, address);
            this.status(`${response.results.length} result(s)`);
        } catch (error) {
            this.status(`error: ${(error as Error).message}`);
        }
    }

    private showSingleResults(results: ResultJson[], ruid: string | null, address: string): void {
        this.lastResults = results;
        this.ruid = ruid;
        this.records.clear();
        if (ruid) location.hash = `ruid=${ruid}`;
        this.map.clearMarkers();
        results.forEach((result, index) => {
            const markerId = `record-${index}`;
            this.map.addMarker({
                id: markerId,
                x: result.point[0],
                y: result.point[1],
                radiusPx: markerRadius(result.accuracy_m),
                className: result.precision_class,
                title: result.name_historical,
                draggable: ruid !== null,
            });
            if (ruid) {
                this.records.set(index, {
                    record: {
                        record_id: index,
                        row_index: 0,
                        query: { address },
                        result,
                        created_at: '',
                        edited: false,
                    },
                    requeryAddress: address,
                    markerId,
                });
            }
        });
        this.map.fitMarkers();
        renderResultsList(this.resultsList, results, (r) => this.openEditorForResult(r));
    }

    // ------------------------------------------------------------------
    // batch

    async submitBatchCsv(csvText: string): Promise<void> {
        try {
            const { csv, ruid } = await this.api.batch(csvText);
            this.lastBatchCsv = csv;
            this.ruid = ruid;
            location.hash = `ruid=${ruid}`;
            this.renderBatchTable(csv);
            (this.root.querySelector('#batch-open-map') as HTMLButtonElement).disabled = false;
            (this.root.querySelector('#batch-download') as HTMLButtonElement).disabled = false;
            this.status(`batch done, session ${ruid}`);
        } catch (error) {
            this.status(`error: ${(error as Error).message}`);
        }
    }

    private renderBatchTable(csv: string): void {
        const table = parseCsv(csv);
        this.batchTable.replaceChildren();
        const head = this.batchTable.insertRow();
        for (const name of [...table.header, 'edited']) {
            const th = document.createElement('th');
            th.textContent = name;
            head.appendChild(th);
        }
        for (const row of table.rows) {
            const tr = this.batchTable.insertRow();
            tr.className = 'batch-row';
            for (const cell of row) tr.insertCell().textContent = cell;
            tr.insertCell().className = 'edited-cell';
        }
    }

    download(): void {
        if (!this.lastBatchCsv || typeof URL.createObjectURL !== 'function') return;
        const url = URL.createObjectURL(new Blob([this.lastBatchCsv], { type: 'text/csv' }));
        const anchor = document.createElement('a');
        anchor.href = url;
        anchor.download = 'geocoded.csv';
        anchor.click();
        URL.revokeObjectURL(url);
    }

    // ------------------------------------------------------------------
    // session restore + markers for persisted records

    async openRuid(ruid: string): Promise<void> {
        try {
            const resultSet = await this.api.results(ruid);
            this.ruid = resultSet.ruid;
            location.hash = `ruid=${resultSet.ruid}`;
            this.records.clear();
            this.map.clearMarkers();

            const addressByRow = this.addressesFromBatchCsv();
            if (!this.lastBatchCsv) this.renderRecordsTable(resultSet.records);
            const tableRows = [...this.batchTable.querySelectorAll<HTMLTableRowElement>('.batch-row')];

            for (const record of resultSet.records) {
                const markerId = `record-${record.record_id}`;
                this.map.addMarker({
                    id: markerId,
                    x: record.result.point[0],
                    y: record.result.point[1],
                    radiusPx: markerRadius(record.result.accuracy_m),
                    className:
                        record.result.precision_class + (record.edited ? ' edited' : ''),
                    title: record.result.name_historical,
                    draggable: true,
                });
                this.records.set(record.record_id, {
                    record,
                    requeryAddress:
                        addressByRow.get(record.row_index) ?? record.result.name_historical,
                    markerId,
                    tableRow: tableRows[record.row_index],
                });
                if (record.edited) this.markRowEdited(record.record_id);
            }
            this.map.fitMarkers();
            this.status(`session ${resultSet.ruid}: ${resultSet.records.length} record(s)`);
        } catch (error) {
            this.status(`error: ${(error as Error).message}`);
        }
    }

    private addressesFromBatchCsv(): Map<number, string> {
        const out = new Map<number, string>();
        if (!this.lastBatchCsv) return out;
        const column = (this.root.querySelector('#batch-address-column') as HTMLInputElement).value;
        toObjects(parseCsv(this.lastBatchCsv)).forEach((row, index) => {
            if (row[column] !== undefined) out.set(index, row[column]);
        });
        return out;
    }

    private renderRecordsTable(records: ResultRecordJson[]): void {
        this.batchTable.replaceChildren();
        const head = this.batchTable.insertRow();
        for (const name of ['row', 'matched', 'score', 'precision', 'edited']) {
            const th = document.createElement('th');
            th.textContent = name;
            head.appendChild(th);
        }
        for (const record of records) {
            const tr = this.batchTable.insertRow();
            tr.className = 'batch-row';
            tr.insertCell().textContent = String(record.row_index);
            tr.insertCell().textContent = record.result.name_historical;
            tr.insertCell().textContent = String(record.result.score);
            tr.insertCell().textContent = record.result.precision_class;
            tr.insertCell().className = 'edited-cell';
        }
    }

    private markRowEdited(recordId: number): void {
        const state = this.records.get(recordId);
        if (!state) return;
        state.record.edited = true;
        const row =
            state.tableRow ??
            [...this.batchTable.querySelectorAll<HTMLTableRowElement>('.batch-row')][
                state.record.row_index
            ];
        const cell = row?.querySelector<HTMLTableCellElement>('.edited-cell');
        if (cell) cell.textContent = 'edited';
        this.map.markers.get(state.markerId)?.element.classList.add('edited');
    }

    // ------------------------------------------------------------------
    // edits

    private recordIdForMarker(marker: Marker): number | null {
        for (const [recordId, state] of this.records) {
            if (state.markerId === marker.id) return recordId;
        }
        return null;
    }

    async applyDragEdit(marker: Marker, x: number, y: number): Promise<void> {
        const recordId = this.recordIdForMarker(marker);
        if (this.ruid === null || recordId === null) return;
        try {
            await this.api.edit(this.ruid, recordId, {
                geometry: { kind: 'point', coordinates: [x, y] },
                note: 'moved on map',
            });
            this.markRowEdited(recordId);
            await this.requery(recordId);
            this.status(`edit saved for record ${recordId}`);
        } catch (error) {
            this.status(`edit failed: ${(error as Error).message}`);
        }
    }

    private openEditor(marker: Marker): void {
        const recordId = this.recordIdForMarker(marker);
        if (recordId !== null) this.openEditorForRecord(recordId);
    }

    private openEditorForResult(result: ResultJson): void {
        for (const [recordId, state] of this.records) {
            if (state.record.result.id === result.id) {
                this.openEditorForRecord(recordId);
                return;
            }
        }
    }

    openEditorForRecord(recordId: number): void {
        const state = this.records.get(recordId);
        if (!state) return;
        this.editTarget = recordId;
        const result = state.record.result;
        (this.root.querySelector('#edit-x') as HTMLInputElement).value = String(result.point[0]);
        (this.root.querySelector('#edit-y') as HTMLInputElement).value = String(result.point[1]);
        (this.root.querySelector('#edit-historical') as HTMLInputElement).value =
            result.name_historical;
        (this.root.querySelector('#edit-normalized') as HTMLInputElement).value =
            result.name_normalized;
        (this.root.querySelector('#edit-note') as HTMLInputElement).value = '';
        this.editDate.setValues(result.period);
        this.editPanel.hidden = false;
    }

    private async submitEditorEdit(): Promise<void> {
        if (this.editTarget === null || this.ruid === null) return;
        if (!this.editDate.isValid()) {
            this.status('edit blocked: invalid date breakpoints');
            return;
        }
        const x = Number((this.root.querySelector('#edit-x') as HTMLInputElement).value);
        const y = Number((this.root.querySelector('#edit-y') as HTMLInputElement).value);
        const note = (this.root.querySelector('#edit-note') as HTMLInputElement).value;
        try {
            await this.api.edit(this.ruid, this.editTarget, {
                geometry: { kind: 'point', coordinates: [x, y] },
                period: this.editDate.values(),
                historical_name: (this.root.querySelector('#edit-historical') as HTMLInputElement)
                    .value,
                normalized_name: (this.root.querySelector('#edit-normalized') as HTMLInputElement)
                    .value,
                note: note || undefined,
            });
            this.markRowEdited(this.editTarget);
            await this.requery(this.editTarget);
            this.editPanel.hidden = true;
            this.status(`edit saved for record ${this.editTarget}`);
        } catch (error) {
            this.status(`edit failed: ${(error as Error).message}`);
        }
    }

    /** After an edit, re-run the record's query so the freshly created
     * object shows up among the candidates. */
    private async requery(recordId: number): Promise<void> {
        const state = this.records.get(recordId);
        if (!state) return;
        const response = await this.api.geocode({
            address: state.requeryAddress,
            maxresults: 10,
        });
        this.lastResults = response.results;
        renderResultsList(this.resultsList, response.results, (r) => this.openEditorForResult(r));
    }
}

export function createApp(root: HTMLElement, config: AppConfig = {}): App {
    return new App(root, config);
}
