from tomoportrait.cli import main

raise SystemExit(main())
