// Four-field fuzzy date editor with a slider preview of the trapezoid.
// The ordering a <= b <= c <= d is enforced: violating values mark the
// editor invalid and block submission.

export class DateEditor {
    readonly root: HTMLElement;
    readonly inputs: [HTMLInputElement, HTMLInputElement, HTMLInputElement, HTMLInputElement];
    private readonly message: HTMLElement;
    private readonly preview: SVGPolygonElement;

    constructor(initial: [number, number, number, number] = [1850, 1850, 1851, 1851]) {
        this.root = document.createElement('div');
        this.root.className = 'date-editor';
        const labels = ['start (0)', 'full from', 'full until', 'end (0)'];
        this.inputs = [0, 1, 2, 3].map((i) => {
            const wrap = document.createElement('label');
            wrap.textContent = labels[i];
            const input = document.createElement('input');
            input.type = 'number';
            input.step = 'any';
            input.value = String(initial[i]);
            input.className = `date-handle date-handle-${'abcd'[i]}`;
            input.addEventListener('input', () => this.refresh());
            wrap.appendChild(input);
            this.root.appendChild(wrap);
            return input;
        }) as typeof this.inputs;

        const svg = document.createElementNS('http://www.w3.org/2000/svg', 'svg');
        svg.setAttribute('class', 'date-preview');
        svg.setAttribute('width', '180');
        svg.setAttribute('height', '40');
        this.preview = document.createElementNS('http://www.w3.org/2000/svg', 'polygon');
        svg.appendChild(this.preview);
        this.root.appendChild(svg);

        this.message = document.createElement('p');
        this.message.className = 'date-editor-message';
        this.root.appendChild(this.message);
        this.refresh();
    }

    values(): [number, number, number, number] {
        return this.inputs.map((i) => Number(i.value)) as [number, number, number, number];
    }

    setValues(values: [number, number, number, number]): void {
        values.forEach((v, i) => {
            this.inputs[i].value = String(v);
        });
        this.refresh();
    }

    isValid(): boolean {
        const [a, b, c, d] = this.values();
        return [a, b, c, d].every(Number.isFinite) && a <= b && b <= c && c <= d;
    }

    private refresh(): void {
        const valid = this.isValid();
        this.root.classList.toggle('invalid', !valid);
        this.message.textContent = valid ? '' : 'breakpoints must satisfy a ≤ b ≤ c ≤ d';
        const [a, b, c, d] = this.values();
        if (valid && d > a) {
            const sx = (t: number) => ((t - a) / (d - a)) * 176 + 2;
            this.preview.setAttribute(
                'points',
                `${sx(a)},38 ${sx(b)},2 ${sx(c)},2 ${sx(d)},38`,
            );
        } else {
            this.preview.setAttribute('points', '2,38 2,2 178,2 178,38');
        }
    }
}
